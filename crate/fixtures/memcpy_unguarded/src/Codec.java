package media;

public class Codec {
    native void decode(byte[] frame, int len);

    void onFrame(byte[] frame, int len) {
        decode(frame, len);
    }
}
