// YuvOperator.java source file
public class YuvOperator {
    native static void jniRotate(ByteBuf handler);

    void rotate(byte[] yuv, int width) {
        handler = jniStoreYuvData(yuv, width);
        jniRotate(handler);
    }
}
