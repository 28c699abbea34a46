import java.io.InputStream;

public class Loader {
    native void feed(byte[] data);

    void pull(InputStream in) {
        byte[] chunk = new byte[64];
        in.read(chunk);
        feed(chunk);
    }
}
