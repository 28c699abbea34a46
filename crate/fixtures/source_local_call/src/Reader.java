public class Reader {
    native void feed(byte[] data);

    int read(byte[] data) {
        return data.length;
    }

    void pump() {
        byte[] chunk = new byte[64];
        read(chunk);
        feed(chunk);
    }
}
